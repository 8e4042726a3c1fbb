"""Top-level package for the tpq twig pattern query engine."""

"""Sub-commands; each module provides ``register`` and ``handle``."""

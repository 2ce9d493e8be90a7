"""Core exact arithmetic, LP, configuration and errors."""

"""Allow ``python -m mmskit``."""

from .cli import main

main()

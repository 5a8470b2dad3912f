"""Module entry point for `python -m dualattack`."""

from .cli import main

if __name__ == "__main__":
    main()

"""Allow ``python -m qcorr`` as an alias for the ``qcorr`` command."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())

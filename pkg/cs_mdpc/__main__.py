"""Allow ``python -m cs_mdpc``."""

from .cli import main

main()

#!/usr/bin/env python
"""compid command line: ./manage.py analyze MODEL, ./manage.py help for the rest."""

import os
import sys

from dotenv import load_dotenv

# COMPID_* defaults and DATABASE_URL may live in .env
load_dotenv()


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "settings.dev")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        msg = (
            "Couldn't import Django; compid runs its analyses as Django "
            "management commands. Run `poetry install` and retry inside "
            "`poetry shell`."
        )
        raise ImportError(msg) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()

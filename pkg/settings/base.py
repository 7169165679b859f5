"""
Django settings for the compid project.

The project has no web surface: the analyses run as management commands
(./manage.py analyze cycle4.json) and the database only stores enumeration
runs.
"""

import os
from pathlib import Path

import dj_database_url

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.environ.get("COMPID_SECRET", "not-a-web-app")

DEBUG = False

ALLOWED_HOSTS: list[str] = []

INSTALLED_APPS = [
    "identifiability.apps.IdentifiabilityConfig",
    "django.contrib.contenttypes",
    "import_export",
]

DATABASES = {
    "default": dj_database_url.config(
        default=os.environ.get(
            "DATABASE_URL", f"sqlite:///{BASE_DIR / 'compid.sqlite3'}"
        )
    )
}

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

USE_I18N = False
USE_TZ = True
TIME_ZONE = "UTC"


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    return int(value) if value else default


# Analysis defaults; every command flag falls back to these.
COMPID_SEED = _env_int("COMPID_SEED", 0)
COMPID_TRIALS = _env_int("COMPID_TRIALS", 3)
COMPID_CYCLE_CAP = _env_int("COMPID_CYCLE_CAP", 10_000)
COMPID_SEARCH_BUDGET = _env_int("COMPID_SEARCH_BUDGET", 3)
COMPID_DENOMINATOR_RETRIES = _env_int("COMPID_DENOMINATOR_RETRIES", 10)
COMPID_WORKERS = _env_int("COMPID_WORKERS", 1)

# Ensure logs directory exists.
LOGS_DIR = BASE_DIR / "logs"
LOGS_DIR.mkdir(exist_ok=True)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "django": {"format": "%(asctime)s [%(levelname)s] %(module)s\n%(message)s"},
        "analysis": {"format": "%(asctime)s [%(levelname)s] %(name)s: %(message)s"},
    },
    "handlers": {
        "django": {
            "level": "DEBUG",
            "class": "logging.FileHandler",
            "filename": LOGS_DIR / "django.log",
            "formatter": "django",
        },
        "identifiability": {
            "level": "DEBUG",
            "class": "logging.FileHandler",
            "filename": LOGS_DIR / "identifiability.log",
            "formatter": "analysis",
        },
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "analysis",
        },
    },
    "loggers": {
        "django": {
            "handlers": ["django", "console"],
            "level": "INFO",
            "propagate": True,
        },
        "identifiability": {
            "handlers": ["identifiability", "console"],
            "level": "INFO",
        },
    },
}

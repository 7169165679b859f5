# flake8: noqa
from settings.base import *

DEBUG = True

# Allow for local (per-user) override
try:
    from settings_local import *  # type: ignore
except ImportError:
    pass

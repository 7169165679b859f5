import os

import sentry_sdk
from sentry_sdk.integrations.django import DjangoIntegration

from settings.base import *  # noqa: F403
from settings.sentry import before_send

DEBUG = False

if os.environ.get("SENTRY_DSN"):
    sentry_sdk.init(
        dsn=os.environ["SENTRY_DSN"],
        integrations=[DjangoIntegration()],
        traces_sample_rate=0.1,
        environment=os.environ.get("SENTRY_ENVIRONMENT", "production"),
        before_send=before_send,
    )

from django.apps import AppConfig


class IdentifiabilityConfig(AppConfig):
    name = "identifiability"
    verbose_name = "Compartmental Model Identifiability"
    default_auto_field = "django.db.models.BigAutoField"

from django.apps import AppConfig


class FpmcConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fpmc'

from django.apps import AppConfig


class PolyboundsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'polybounds'

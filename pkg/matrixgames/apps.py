from django.apps import AppConfig


class MatrixgamesConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'matrixgames'

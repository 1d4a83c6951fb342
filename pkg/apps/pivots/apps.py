from django.apps import AppConfig


class PivotsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.pivots'
    label = 'pivots'

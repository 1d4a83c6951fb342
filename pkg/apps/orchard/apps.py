from django.apps import AppConfig


class OrchardConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.orchard'
    label = 'orchard'

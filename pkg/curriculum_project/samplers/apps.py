from django.apps import AppConfig


class SamplersConfig(AppConfig):
    name = 'samplers'

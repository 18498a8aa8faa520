from django.apps import AppConfig


class ToymodelConfig(AppConfig):
    name = 'toymodel'

from django.apps import AppConfig

class WaveletGridConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'waveletgrid'
    verbose_name = 'Immersed interpolating wavelets'

from django.urls import path

from . import views

app_name = 'fwrank'

urlpatterns = [
    # Matrix endpoints
    path('api/check/', views.check, name='check'),
    path('api/decompose/', views.decompose, name='decompose'),
    path('api/bounds/', views.bounds, name='bounds'),
    path('api/hadamard/', views.hadamard, name='hadamard'),

    # Combinatorial endpoints
    path('api/cover/', views.cover, name='cover'),
    path('api/cliquecover/', views.cliquecover, name='cliquecover'),
    path('api/conjecture/', views.conjecture, name='conjecture'),

    # System endpoints
    path('api/health/', views.health_check, name='health_check'),
]

from django.http import JsonResponse
from django.urls import include, path


def api_root(request):
    return JsonResponse({
        'message': 'Factor width API',
        'version': '1.0',
        'endpoints': {
            'check': '/api/check/',
            'decompose': '/api/decompose/',
            'bounds': '/api/bounds/',
            'hadamard': '/api/hadamard/',
            'cover': '/api/cover/',
            'cliquecover': '/api/cliquecover/',
            'conjecture': '/api/conjecture/',
            'health': '/api/health/',
        }
    })


urlpatterns = [
    path('api/', api_root, name='api_root'),
    path('', include('fwrank.urls')),
]

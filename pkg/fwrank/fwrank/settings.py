"""
Django settings for fwrank project.

Generated by 'django-admin startproject' using Django 5.2.5.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-fwrank-development-key')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', 'True') == 'True'

ALLOWED_HOSTS = [h for h in os.environ.get('DJANGO_ALLOWED_HOSTS', 'localhost,127.0.0.1,testserver').split(',') if h]


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'corsheaders',
    'fwrank',
]

MIDDLEWARE = [
    'corsheaders.middleware.CorsMiddleware',
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'urls'

WSGI_APPLICATION = 'fwrank.wsgi.application'


# Database
# Nothing is persisted; every request is computed from its payload.

DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True

# CORS settings for frontend integration
CORS_ALLOWED_ORIGINS = [
    "http://localhost:3000",
    "http://127.0.0.1:3000",
    "http://localhost:8080",
    "http://127.0.0.1:8080",
]

CORS_ALLOW_ALL_ORIGINS = DEBUG  # Only for development

# REST Framework settings
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.AllowAny',
    ],
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'UNAUTHENTICATED_USER': None,
}

# Factor width settings
FACTOR_WIDTH = {
    'TOL_PSD': float(os.environ.get('FW_TOL_PSD', '1e-9')),
    'TOL_RECON': float(os.environ.get('FW_TOL_RECON', '1e-8')),
    'TOL_ZERO': float(os.environ.get('FW_TOL_ZERO', '1e-12')),
    'MAX_ITER': int(os.environ.get('FW_MAX_ITER', '50000')),
    'BUDGET': int(os.environ.get('FW_BUDGET', '10000000')),
    'M_CAP': int(os.environ.get('FW_M_CAP', '10000')),
    'N_LIMIT': int(os.environ.get('FW_N_LIMIT', '8')),
    'MEMBERSHIP_LIMIT': int(os.environ.get('FW_MEMBERSHIP_LIMIT', '10')),
    'SEED': int(os.environ.get('FW_SEED', '0')),
}

# Logs go to stderr; stdout carries the reports
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'fwrank': {
            'handlers': ['stderr'],
            'level': os.environ.get('FW_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}

"""
WSGI entry point serving the fwrank JSON API as ``application``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'fwrank.settings')

application = get_wsgi_application()

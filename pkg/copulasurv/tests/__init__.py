import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'copulasurv.tests.settings')
django.setup()

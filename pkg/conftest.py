import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'CSG.settings')
django.setup()

"""
Django settings for the CSG solver project.

The project has no database, views or middleware: Django supplies the
settings layer, logging configuration, management commands and the test
runner.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Build paths inside the project
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('SECRET_KEY', 'csg-solver-local')

DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Third party apps
    'rest_framework',

    # Local apps
    'games',
    'linalg',
    'matrixgames',
    'kernel',
    'Engines',
    'fpmc',
    'certificates',
    'polybounds',
    'cli',
]

# No persistence: every solve is a pure computation over the input document
DATABASES = {}

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Solver settings
CSG_ENUMERATION_CAP = int(os.getenv('CSG_ENUMERATION_CAP', '4096'))

# Exact-mode limit solving refuses instances beyond this size
CSG_EXACT_MAX_STATES = int(os.getenv('CSG_EXACT_MAX_STATES', '3'))
CSG_EXACT_MAX_ACTIONS = int(os.getenv('CSG_EXACT_MAX_ACTIONS', '2'))
CSG_EXACT_MAX_FACTORS = int(os.getenv('CSG_EXACT_MAX_FACTORS', '2'))

# 'outermost': the most important priority gets the slowest-vanishing factor
CSG_PARITY_ORDERING = os.getenv('CSG_PARITY_ORDERING', 'outermost')

CSG_DEFAULT_LADDER = os.getenv('CSG_DEFAULT_LADDER', '2^-4,2^-6,2^-8,2^-10,2^-12')

CSG_ORACLE_MAX_ITERATIONS = int(os.getenv('CSG_ORACLE_MAX_ITERATIONS', '1000000'))

CSG_LOG_LEVEL = os.getenv('CSG_LOG_LEVEL', 'INFO')

# Create logs directory if it doesn't exist
LOGS_DIR = BASE_DIR / 'logs'
LOGS_DIR.mkdir(exist_ok=True)


# Logging Configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
        'file': {
            'level': CSG_LOG_LEVEL,
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': os.path.join(BASE_DIR, 'logs', 'csg.log'),
            'maxBytes': 1024 * 1024 * 5,  # 5 MB
            'backupCount': 5,
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console', 'file'],
            'level': 'WARNING',
            'propagate': True,
        },
        'games': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'linalg': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'matrixgames': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'Engines': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'kernel': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'certificates': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'fpmc': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'polybounds': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
        'cli': {
            'handlers': ['console', 'file'],
            'level': CSG_LOG_LEVEL,
            'propagate': False,
        },
    }
}

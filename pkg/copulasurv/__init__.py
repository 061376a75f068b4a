VERSION = '1.0a1'
default_app_config = 'copulasurv.apps.CopulaSurvConfig'

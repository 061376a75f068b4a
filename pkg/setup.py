from setuptools import setup

setup(
    name='django-copulasurv',
    version=__import__('copulasurv').VERSION,
    description='Archimedean copula models for clustered right-censored survival data.',
    packages=['copulasurv', 'copulasurv.management', 'copulasurv.management.commands', 'copulasurv.tests'],
    zip_safe=False,
    include_package_data=True,
    install_requires=[
        'Django>=3.1',
        'numpy>=1.17',
        'scipy>=1.4',
        'pandas>=1.5',
    ],
    entry_points={
        'console_scripts': ['copulasurv=copulasurv.cli:main'],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Framework :: Django',
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ]
)

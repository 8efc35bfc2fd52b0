from setuptools import setup, find_packages

setup(
    name='capcorr',
    version='0.3.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    python_requires='>=3.9.0',
    scripts=['scripts/capcorr'],
    long_description_content_type="text/markdown",
    license='GPL 3',
    description='capcorr measures how strongly safety benchmarks track general capabilities across a population of '
                'models, and scores prediction logs for calibration.',
    include_package_data=True,
    install_requires=[
        'coloredlogs==15.0',
        'tabulate==0.8.9',
        'PyYAML==6.0.1',
        'docstring-parser==0.7.3',
        'marshmallow==3.19.0',
        'numpy==1.26.4',
        'pandas==2.1.4',
        'scipy==1.11.4',
        'pytest==7.4.4',
    ],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Natural Language :: English',
        'Programming Language :: Python :: 3.9',
        'Operating System :: OS Independent',
        'Environment :: Console',
        'Topic :: Scientific/Engineering :: Information Analysis',
        'License :: OSI Approved :: GNU General Public License (GPL)'
    ]
)

from setuptools import setup

setup(
    name='txregime',
    version='0.1.0',
    description='Regime-switching hidden Markov models for financial return series',
    long_description='Fits Gaussian hidden Markov models to exponentially weighted moment '
                     'features of daily returns, predicts expected Sharpe ratios of the '
                     'regimes and backtests holding strategies with transaction costs. '
                     'Pipelines run on twisted.',
    license='MIT',
    keywords=['hidden Markov model', 'regime switching', 'backtesting', 'twisted'],
    packages=['txregime'],
    python_requires='>=3.8',
    install_requires=[
        'twisted',
        'numpy>=1.20',
        'scipy',
        'pandas',
        'matplotlib',
    ],
    entry_points={
        'console_scripts': [
            'txregime = txregime.cli:main',
        ],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Financial and Insurance Industry',
        'Intended Audience :: Science/Research',
        'Topic :: Office/Business :: Financial :: Investment',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Framework :: Twisted',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
    ],
)

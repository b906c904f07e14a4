"""Statistical toolkit and analyses of Euroleague history."""

__version__ = "0.1.0"

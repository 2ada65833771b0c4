"""Limit order book mid-price direction forecasting toolkit."""

__version__ = "0.1.0"

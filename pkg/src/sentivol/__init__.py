"""Sentiment indicators from stock-forum posts fused with volatility in an Elman RNN."""

__version__ = "0.1.0"

"""Gateway-diversity evaluation toolkit for Q/V-band feeder links."""

__version__ = "0.1.0"

"""Pass Pattern Miner - Recurring pass sequences of soccer teams from event logs."""

__version__ = "1.0.0"

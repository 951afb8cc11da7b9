"""Cost analysis for PCF programs: evaluate, embed into a polarized
intermediate language, extract recurrences, and bound costs in a sized
denotational model."""

__version__ = "0.1.0"

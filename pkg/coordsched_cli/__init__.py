"""
coordsched CLI Tool

Compiles coordination-language applications into energy-aware schedules for
heterogeneous multi-core platforms and verifies them by simulation.
"""

__version__ = "1.0.0"
__author__ = "coordsched Team"

"""SIET Feasibility - coverage and energy-harvesting analysis for PPP small cell networks."""

__version__ = "1.0.0"
__title__ = "SIET Feasibility"
__description__ = "Stochastic-geometry analysis of simultaneous information and energy transfer"

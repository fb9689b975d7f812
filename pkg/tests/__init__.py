"""Test suite for the SIET feasibility toolkit."""

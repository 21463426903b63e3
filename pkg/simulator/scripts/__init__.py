"""Utility scripts for acceptance evaluation."""

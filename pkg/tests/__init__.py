"""Tests package for Sphere Energy."""

"""
vertical-squash Test Suite.

This package contains unit and integration tests for the vertical-squash
reconstruction library and its command-line front end.
"""

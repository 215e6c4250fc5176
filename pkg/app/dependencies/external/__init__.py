"""
External dependencies: configuration and the on-disk resolution store.
"""

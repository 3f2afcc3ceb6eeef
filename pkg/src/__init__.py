"""Pointer-chain simulator packages."""

"""Hecke pairs acting on Fell bundles over finite groupoids, and their crossed products."""

from pynbhd.recommenders.so.slopeone import SlopeOne


__all__ = ['SlopeOne']

"""A histogram that records which pipeline stage reads its raw bins."""

from collections import Counter

from redpoctor import DayHistogram
from redpoctor.pipeline import current_stage


class ProbeHistogram(DayHistogram):
    reads: Counter = Counter()

    @classmethod
    def wrap(cls, h):
        obj = object.__new__(cls)
        obj.__dict__.update(day=h.day, bins=h.bins, bin_width_minutes=h.bin_width_minutes)
        return obj

    @property
    def bins(self):
        ProbeHistogram.reads[current_stage()] += 1
        return self.__dict__["bins"]

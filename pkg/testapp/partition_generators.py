from boundary_dimension.interval_partition import IntervalPartition
from boundary_dimension.registry import register_generator


@register_generator('middle-thirds')
def middle_thirds(truncation: int) -> IntervalPartition:
    """The two branches of the middle-thirds Cantor map."""
    intervals = [(2 / 3, 1.0), (0.0, 1 / 3)][:truncation]
    return IntervalPartition.from_arrays([a for a, _ in intervals], [b for _, b in intervals],
                                         generator='middle-thirds')

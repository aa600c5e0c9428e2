from typing import Tuple


class Version(object):
    """Immutable package version"""

    def __setattr__(self, *args):
        raise TypeError("can't modify immutable instance")
    __delattr__ = __setattr__

    def __init__(self, num: str):
        super(Version, self).__setattr__('number', num)

    @property
    def parts(self) -> Tuple[int, ...]:
        return tuple(int(part) for part in self.number.split('.'))

    def __str__(self):
        return self.number


__version__ = Version('0.1.0')

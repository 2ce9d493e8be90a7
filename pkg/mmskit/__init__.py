"""mmskit: exact verification and exploration of nonnegative k-sum bounds."""

from .version import __version__

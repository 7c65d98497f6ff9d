"""
Conic Bundles - Core Package
二次曲线丛有理性判定工具包
"""

__version__ = "1.0.0"

from src.visualizer.map_builder import LoadingMapBuilder, format_pgm, to_gray

__all__ = ["LoadingMapBuilder", "format_pgm", "to_gray"]

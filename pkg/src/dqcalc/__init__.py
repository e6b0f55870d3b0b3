"""Graph complexes, formality weights and characteristic series for deformation quantization."""

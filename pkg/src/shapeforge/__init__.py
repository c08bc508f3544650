"""shapeforge: compiler and runtime for part-structured 3D shape programs.

Subpackages
-----------
dsl        program language: AST types, parser, printer, validation, retargeting
geometry   mesh kernel executing statements into watertight triangle meshes
sampler    seeded probabilistic generation of paired (program, mesh) data
pointcloud surface sampling, unit-cube normalization, augmentation
assembly   part canonicalization, spatial ordering, object-program emission
metrics    Chamfer distance, solid voxelization, voxel IoU, batch evaluation
cli        command-line pipeline (generate | exec | assemble | eval | export)
"""

__version__ = "0.1.0"

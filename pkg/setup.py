import setuptools

setuptools.setup(
    name="code_basis_reduction",
    version="0.1.0",
    description="Basis reduction for linear codes over finite fields",
    long_description="LLL, BKZ, slide, backward and Griesmer-style reduction of generator matrices of q-ary linear codes, with the fundamental domain weight distribution and a benchmark runner for random codes",
    license="Apache Software License",
    packages=["code_basis_reduction"],
    zip_safe=False,
    install_requires=["numpy>=2.0", "galois>=0.4", 'tomli>=2.0; python_version<"3.11"'],
    python_requires=">=3.10",
    include_package_data=True,
    package_data={},
    entry_points={"console_scripts": ["code-basis-reduction=code_basis_reduction.cli:main"]},
)

#include <CLI11.hpp>

#include <cdg/gmsh_io.hpp>
#include <cdg/meshgen.hpp>

#include <iostream>

// Small fixture generator so the test meshes are reproducible from the
// command line as well.
int main(int argc, char** argv) {
  CLI::App app{"curveddg-meshgen: generate test meshes (Gmsh MSH 2.2)"};

  std::string kind = "cube";
  std::string out = "mesh.msh";
  int n = 3;
  int subdivisions = 1;
  int layers = 8;
  double r_inner = 1.0, r_outer = 8.0;
  app.add_option("--kind", kind, "cube | sphere-shell")->required();
  app.add_option("--out", out, "output path")->required();
  app.add_option("--n", n, "cube cells per side");
  app.add_option("--subdivisions", subdivisions, "icosphere subdivisions");
  app.add_option("--layers", layers, "radial layers");
  app.add_option("--r-inner", r_inner, "inner radius");
  app.add_option("--r-outer", r_outer, "outer radius");

  CLI11_PARSE(app, argc, argv);

  try {
    cdg::Mesh mesh;
    if (kind == "cube") {
      mesh = cdg::make_cube_mesh(n, "wall");
    } else if (kind == "sphere-shell") {
      mesh = cdg::make_sphere_shell_mesh(r_inner, r_outer, subdivisions, layers);
    } else {
      std::cerr << "unknown kind '" << kind << "'\n";
      return 2;
    }
    cdg::write_gmsh_file(mesh, out);
    std::cout << mesh.n_elements() << " tets, " << mesh.vertices.size()
              << " vertices written to " << out << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

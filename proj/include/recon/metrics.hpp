#pragma once

#include <string>
#include <vector>

#include "recon/mesh.hpp"
#include "recon/samples.hpp"

namespace recon {

/// Exact squared distance from p to triangle (a, b, c).
double point_triangle_distance2(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// AABB tree over mesh triangles for nearest-triangle queries. Queries return
/// the exact squared distance to the closest triangle (best-first search with
/// box lower bounds, so results equal brute force).
class TriangleBvh {
public:
    explicit TriangleBvh(const TriangleMesh& mesh);

    double nearest_distance2(const Vec3& p) const;

private:
    struct Node {
        Vec3 lo, hi;
        int left = -1, right = -1;  // children, or leaf when left < 0
        int begin = 0, end = 0;     // triangle range for leaves
    };
    const TriangleMesh& mesh_;
    std::vector<Node> nodes_;
    std::vector<int> order_;

    int build(int begin, int end, std::vector<Vec3>& centroids);
};

/// Root mean square of exact point-to-surface distances from the samples to
/// the mesh. Samples and mesh must share world coordinates.
double rms_distance(const SampleSet& samples, const TriangleMesh& mesh);

/// Discrete curvature statistics: angle-deficit Gaussian curvature and
/// cotangent-Laplacian mean curvature, both normalized by the one-third ring
/// area. Statistics aggregate |H| and |K| over interior vertices; boundary
/// vertices and zero-area triangles are excluded and counted. The pointwise
/// values pass through one median filter over the closed 1-ring, which
/// rejects the isolated spikes that needle triangles of extracted
/// isosurfaces inject into the cotangent weights.
struct CurvatureStats {
    double avg_mean = 0.0, max_mean = 0.0;
    double avg_gauss = 0.0, max_gauss = 0.0;
    std::size_t vertices_used = 0;
    std::size_t boundary_excluded = 0;
    std::size_t degenerate_skipped = 0;
};

CurvatureStats curvature_stats(const TriangleMesh& mesh);

/// One row of the quality report: triangle count, RMS fit error, curvature
/// statistics.
struct ReportRow {
    std::string label;
    std::size_t triangles = 0;
    double rms = 0.0;
    CurvatureStats curvature;
};

ReportRow make_report_row(const std::string& label, const TriangleMesh& mesh,
                          const SampleSet& samples);

std::string format_report_text(const std::vector<ReportRow>& rows);
std::string format_report_tsv(const std::vector<ReportRow>& rows);

}  // namespace recon

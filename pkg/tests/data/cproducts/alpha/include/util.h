#ifndef ALPHA_UTIL_H
#define ALPHA_UTIL_H

static double deg_to_rad(double degrees) {
    return degrees * 3.14159265358979 / 180.0;
}

#endif
